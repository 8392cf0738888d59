#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace quadcount {

// Exit status: 0 ok, 2 usage or validation error, 3 budget exhausted.
int run(int argc, char** argv);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace quadcount
