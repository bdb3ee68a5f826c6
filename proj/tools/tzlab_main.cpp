#include "tzlab/cli_io.hpp"

int main(int argc, char** argv) { return tzlab::run(argc, argv); }
