#include "splatgen/pipeline.hpp"

int main(int argc, char** argv) { return splatgen::run_cli(argc, argv); }
