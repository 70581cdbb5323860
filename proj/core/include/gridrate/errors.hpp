#pragma once

#include <stdexcept>

namespace gridrate {

// Base class for all gridrate errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed external input: match logs, config files, unknown player ids.
class DataError : public Error {
public:
    using Error::Error;
};

// Corrupted or inconsistent persistent state: bad weight sums, schema
// mismatches, incompatible grids.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// The model assigned probability zero to an observed outcome, so the
// posterior is undefined. Only reachable when the luck function attains
// exactly 0 or 1 on the whole support.
class ImpossibleOutcomeError : public Error {
public:
    using Error::Error;
};

}  // namespace gridrate
