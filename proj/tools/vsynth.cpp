#include "vsynth/cli/commands.hpp"

int main(int argc, char** argv) { return vsynth::cli::run(argc, argv); }
