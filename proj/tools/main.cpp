#include "cli.hpp"

int main(int argc, char** argv) { return mfsg::main_entry(argc, argv); }
