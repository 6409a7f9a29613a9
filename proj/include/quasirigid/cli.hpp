#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace quasirigid {

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    (void)args;
    (void)out;
    err << "quasirigid: not yet wired\n";
    return 1;
}

} // namespace quasirigid
