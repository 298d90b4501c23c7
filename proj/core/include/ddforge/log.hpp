#pragma once

#include <functional>
#include <string_view>

namespace ddforge {

// Diagnostics that must not be dropped silently (positivity violations,
// model-validity warnings). The default sink writes one line to stderr.
using LogSink = std::function<void(std::string_view)>;

void set_warning_sink(LogSink sink);
void log_warning(std::string_view message);

}  // namespace ddforge
