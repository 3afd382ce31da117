#pragma once

#include <stdexcept>
#include <string>

namespace suppcom {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input failed schema or range validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A repository could not be opened or queried.
class RepositoryError : public Error {
public:
    using Error::Error;
};

// A remote resource does not exist (tracker 404, missing mock fixture).
class NotFoundError : public Error {
public:
    using Error::Error;
};

// Transport failure, 5xx or 429. `retries_exhausted` is set once the retry
// budget has been spent.
class TransientError : public Error {
public:
    TransientError(const std::string& what, bool retries_exhausted = false)
        : Error(what), retries_exhausted_(retries_exhausted) {}

    bool retries_exhausted() const noexcept { return retries_exhausted_; }

private:
    bool retries_exhausted_;
};

// Network access attempted while the network is denied (offline runs, tests).
class NetworkDeniedError : public Error {
public:
    using Error::Error;
};

}  // namespace suppcom
