#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vsynth {

/// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public IoFailure {
 public:
  explicit FileNotFound(const std::string& path)
      : IoFailure("file not found: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& detail)
      : Error("malformed record at line " + std::to_string(line_no) + ": " + detail),
        line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id) : Error("duplicate id: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class InsufficientSource : public Error {
 public:
  InsufficientSource(const std::string& source, std::size_t have, std::size_t want)
      : Error("source " + source + " has " + std::to_string(have) + " items, " +
              std::to_string(want) + " requested"),
        source_(source), have_(have), want_(want) {}
  const std::string& source() const noexcept { return source_; }
  std::size_t have() const noexcept { return have_; }
  std::size_t want() const noexcept { return want_; }

 private:
  std::string source_;
  std::size_t have_;
  std::size_t want_;
};

/// Any failure to obtain a generation from a backend.
class BackendFailure : public Error {
 public:
  using Error::Error;
};

class Timeout : public BackendFailure {
 public:
  using BackendFailure::BackendFailure;
};

class HttpStatus : public BackendFailure {
 public:
  HttpStatus(int code, std::string body_snippet)
      : BackendFailure("http status " + std::to_string(code) + ": " + body_snippet),
        code_(code), body_snippet_(std::move(body_snippet)) {}
  int code() const noexcept { return code_; }
  const std::string& body_snippet() const noexcept { return body_snippet_; }

 private:
  int code_;
  std::string body_snippet_;
};

class ExhaustedRetries : public BackendFailure {
 public:
  explicit ExhaustedRetries(const std::string& last_error)
      : BackendFailure("retries exhausted; last error: " + last_error), last_error_(last_error) {}
  const std::string& last_error() const noexcept { return last_error_; }

 private:
  std::string last_error_;
};

class NoScriptEntry : public BackendFailure {
 public:
  explicit NoScriptEntry(const std::string& digest)
      : BackendFailure("no script entry for digest " + digest), digest_(digest) {}
  const std::string& digest() const noexcept { return digest_; }

 private:
  std::string digest_;
};

class ImageReadFailure : public BackendFailure {
 public:
  explicit ImageReadFailure(const std::string& path)
      : BackendFailure("cannot read image: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class EmptyAnswer : public Error {
 public:
  EmptyAnswer() : Error("empty answer") {}
};

class ExpansionExhausted : public Error {
 public:
  using Error::Error;
};

class SearchStarved : public Error {
 public:
  using Error::Error;
};

class NoChildren : public Error {
 public:
  NoChildren() : Error("node has no children") {}
};

class JoinFailure : public Error {
 public:
  explicit JoinFailure(const std::string& id) : Error("dangling reference: " + id), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// A prompt template lacks a required slot or repeats one.
class MissingSlot : public Error {
 public:
  using Error::Error;
};

class SliceTooLarge : public Error {
 public:
  SliceTooLarge(std::size_t requested, std::size_t available)
      : Error("slice of " + std::to_string(requested) + " requested from " +
              std::to_string(available) + " records") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsynth
