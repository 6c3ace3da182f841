#pragma once

#include <string>

#include "chasekit/text_io.hpp"

#ifndef CHASEKIT_TEST_DATA
#error "CHASEKIT_TEST_DATA must point at tests/data"
#endif

namespace fixture {

inline std::string dataPath(const std::string& name) { return std::string(CHASEKIT_TEST_DATA) + "/" + name; }

inline chasekit::Document load(const std::string& name) { return chasekit::loadDocument(dataPath(name)); }

} // namespace fixture
