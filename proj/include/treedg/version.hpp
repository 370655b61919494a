#ifndef TREEDG_VERSION_HPP
#define TREEDG_VERSION_HPP

namespace treedg {

inline constexpr const char* version_string = "treedg 0.1.0";

} // namespace treedg

#endif
