#include "uerc/cli.hpp"

int main(int argc, char** argv) { return uerc::cli::run(argc, argv); }
