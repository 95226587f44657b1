#include "cli.hpp"

int main(int argc, char** argv) { return cvghz::cli::run(argc, argv); }
