#include "cli.hpp"

int main(int argc, char** argv) { return womac::cli::run(argc, argv); }
