#include "pklap/cli.hpp"

int main(int argc, char** argv) { return pklap::cli::run(argc, argv); }
