#pragma once

namespace aeroprint {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from AEROPRINT_LOG (error | info | debug), default error.
LogLevel log_level();

void log_write(LogLevel level, const char* fmt, ...)
    __attribute__((format(printf, 2, 3)));

}  // namespace aeroprint

#define LOG_ERROR(...) ::aeroprint::log_write(::aeroprint::LogLevel::Error, __VA_ARGS__)
#define LOG_INFO(...) ::aeroprint::log_write(::aeroprint::LogLevel::Info, __VA_ARGS__)
#define LOG_DEBUG(...) ::aeroprint::log_write(::aeroprint::LogLevel::Debug, __VA_ARGS__)
