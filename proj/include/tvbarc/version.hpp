#pragma once

namespace tvbarc {

inline constexpr const char* version = "0.1.0";

}  // namespace tvbarc
