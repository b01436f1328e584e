#include "taoquant/cli.hpp"

int main(int argc, char** argv) { return taoquant::cli::run(argc, argv); }
