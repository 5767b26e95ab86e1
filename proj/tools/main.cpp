#include "cli.hpp"

int main(int argc, char** argv) { return aplclt::cli::run(argc, argv); }
