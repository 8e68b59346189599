#pragma once

namespace deconv {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

} // namespace deconv
