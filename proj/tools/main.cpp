#include "kvf/cli.hpp"

int main(int argc, char** argv) { return kvf::cli::run(argc, argv); }
