#include "elg/cli.hpp"

int main(int argc, char** argv) { return elg::cli::run(argc, argv); }
