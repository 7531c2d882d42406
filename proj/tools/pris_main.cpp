#include "cli/commands.hpp"

int main(int argc, char** argv) { return pris::cli::run(argc, argv); }
