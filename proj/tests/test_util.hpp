#pragma once

// Minimal always-on test harness: non-fatal CHECKs, fatal REQUIREs, one
// summary line per binary. Exit code 1 on any failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace testutil {

inline int checks = 0;
inline int failures = 0;

inline int summary(const char* name) {
  if (failures == 0) {
    std::printf("[PASS] %s: %d checks\n", name, checks);
    return 0;
  }
  std::printf("[FAIL] %s: %d of %d checks failed\n", name, failures, checks);
  return 1;
}

}  // namespace testutil

#define CHECK(cond)                                                      \
  do {                                                                   \
    ++testutil::checks;                                                  \
    if (!(cond)) {                                                       \
      std::fprintf(stderr, "[FAIL] %s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++testutil::failures;                                              \
    }                                                                    \
  } while (0)

#define CHECK_MSG(cond, ...)                                             \
  do {                                                                   \
    ++testutil::checks;                                                  \
    if (!(cond)) {                                                       \
      std::fprintf(stderr, "[FAIL] %s:%d: %s | ", __FILE__, __LINE__, #cond); \
      std::fprintf(stderr, __VA_ARGS__);                                 \
      std::fputc('\n', stderr);                                          \
      ++testutil::failures;                                              \
    }                                                                    \
  } while (0)

#define CHECK_NEAR(a, b, tol)                                                \
  do {                                                                       \
    ++testutil::checks;                                                      \
    const double va_ = (a);                                                  \
    const double vb_ = (b);                                                  \
    if (!(std::fabs(va_ - vb_) <= (tol))) {                                  \
      std::fprintf(stderr, "[FAIL] %s:%d: |%s - %s| = |%.12g - %.12g| > %g\n", \
                   __FILE__, __LINE__, #a, #b, va_, vb_, (double)(tol));     \
      ++testutil::failures;                                                  \
    }                                                                        \
  } while (0)

#define REQUIRE(cond)                                                     \
  do {                                                                    \
    ++testutil::checks;                                                   \
    if (!(cond)) {                                                        \
      std::fprintf(stderr, "[FAIL] %s:%d: REQUIRE %s\n", __FILE__, __LINE__, \
                   #cond);                                                \
      std::exit(1);                                                       \
    }                                                                     \
  } while (0)

#define CHECK_THROWS(expr, ExceptionType)                                   \
  do {                                                                      \
    ++testutil::checks;                                                     \
    bool caught_ = false;                                                   \
    try {                                                                   \
      (void)(expr);                                                         \
    } catch (const ExceptionType&) {                                        \
      caught_ = true;                                                       \
    } catch (...) {                                                         \
    }                                                                       \
    if (!caught_) {                                                         \
      std::fprintf(stderr, "[FAIL] %s:%d: expected %s from %s\n", __FILE__, \
                   __LINE__, #ExceptionType, #expr);                        \
      ++testutil::failures;                                                 \
    }                                                                       \
  } while (0)
