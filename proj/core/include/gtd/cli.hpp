#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gtd {

// Exit codes: 0 ok, 1 usage/config, 2 data, 3 model/training.
// Commands: stats, train, eval, predict, benchmark.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace gtd
