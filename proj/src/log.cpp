#include "ldem/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>

namespace ldem {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& sink_slot() {
    static WarningSink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(sink_mutex());
    std::swap(sink_slot(), sink);
    return sink;
}

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (sink_slot()) sink_slot()(message);
}

unsigned worker_threads() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LDEM_THREADS")) {
        try {
            long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
        } catch (const std::exception&) {
            warn(std::string("ignoring malformed LDEM_THREADS=") + env);
        }
    }
    return hw;
}

}  // namespace ldem
