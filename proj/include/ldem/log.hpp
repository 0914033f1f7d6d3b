#pragma once

#include <functional>
#include <string>

namespace ldem {

using WarningSink = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink and returns the previous one.
// The default sink writes "warning: <msg>" to stderr.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

// Worker thread cap from LDEM_THREADS (falls back to hardware concurrency).
unsigned worker_threads();

}  // namespace ldem
