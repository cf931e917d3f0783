#include "symrate/cli.hpp"

int main(int argc, char** argv) { return symrate::cli::run(argc, argv); }
