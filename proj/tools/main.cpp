#include "cli/commands.hpp"

int main(int argc, char** argv) { return alphamod::cli::run(argc, argv); }
