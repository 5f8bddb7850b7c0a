#pragma once

#include <stdexcept>
#include <string>

namespace aeroprint {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite or otherwise unusable geometric input.
class GeometryError : public Error {
public:
  using Error::Error;
};

// Parameter outside its documented domain (v_ex <= 0, dt <= 0, ...).
class ParamError : public Error {
public:
  using Error::Error;
};

// Mission or schedule document violates its schema; the message names the
// offending field.
class SchemaError : public Error {
public:
  using Error::Error;
};

}  // namespace aeroprint
