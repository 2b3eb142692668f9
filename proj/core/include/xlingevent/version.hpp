#pragma once

namespace xlingevent {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kRunMetadataSchemaVersion = 1;

}  // namespace xlingevent
