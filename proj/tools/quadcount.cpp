#include "quadcount/cli.hpp"

int main(int argc, char** argv) { return quadcount::run(argc, argv); }
