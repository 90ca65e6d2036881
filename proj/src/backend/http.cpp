#include "vsynth/backend/http.hpp"

#include <httplib.h>

#include <cstdlib>
#include <random>
#include <thread>

#include "vsynth/backend/wire.hpp"
#include "vsynth/common/error.hpp"

namespace vsynth::backend {
namespace {

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string snippet(const std::string& body) { return body.substr(0, 200); }

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg) : Backend(std::move(cfg)) {
  const std::string& url = *config().endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint_url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::chrono::milliseconds HttpBackend::backoff_delay(int attempt) {
  const auto& rb = config().retry_backoff;
  auto delay = rb.base * (std::int64_t{1} << std::min(attempt, 20));
  delay = std::min(delay, rb.max_delay);
  if (rb.jitter.count() > 0) {
    thread_local std::minstd_rand jitter_rng{std::random_device{}()};
    delay += std::chrono::milliseconds(jitter_rng() % (rb.jitter.count() + 1));
  }
  return delay;
}

GenerationResponse HttpBackend::do_complete(const GenerationRequest& req) {
  const std::string body = render_wire(req, *config().model_name);

  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config().timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config().timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  std::exception_ptr last;
  std::string last_error;
  for (int attempt = 0; attempt <= config().max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(backoff_delay(attempt - 1));

    httplib::Headers headers;
    if (config().auth_env_var) {
      if (const char* token = std::getenv(config().auth_env_var->c_str())) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::Write ||
          err == httplib::Error::ConnectionTimeout) {
        last_error = "timeout: " + httplib::to_string(err);
        last = std::make_exception_ptr(Timeout(last_error));
      } else {
        last_error = "transport error: " + httplib::to_string(err);
        last = std::make_exception_ptr(BackendFailure(last_error));
      }
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      auto resp = parse_wire_response(res->body);
      return resp;
    }
    if (!retryable_status(res->status)) throw HttpStatus(res->status, snippet(res->body));
    HttpStatus status(res->status, snippet(res->body));
    last_error = status.what();
    last = std::make_exception_ptr(status);
  }
  // A single-attempt configuration surfaces the underlying error unchanged.
  if (config().max_retries == 0 && last) std::rethrow_exception(last);
  throw ExhaustedRetries(last_error);
}

}  // namespace vsynth::backend
