#ifndef DMCOOL_VERSION_HPP
#define DMCOOL_VERSION_HPP

namespace dmcool {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
