#include "fracdiff/cli.hpp"

int main(int argc, char** argv) { return fracdiff::cli::run(argc, argv); }
