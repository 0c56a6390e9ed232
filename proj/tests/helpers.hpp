#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "apexmr/scenario.hpp"

#ifndef APEXMR_FIXTURE_DIR
#define APEXMR_FIXTURE_DIR "fixtures"
#endif

namespace apexmr::testing {

inline std::string fixturePath(const std::string &name) {
    return std::string(APEXMR_FIXTURE_DIR) + "/" + name;
}

inline std::string readFile(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scenario loadFixture(const std::string &name) {
    return parseScenario(readFile(fixturePath(name)));
}

}  // namespace apexmr::testing
