#include "commands.hpp"

int main(int argc, char** argv) { return ipts::cli::run(argc, argv); }
