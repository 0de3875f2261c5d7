#pragma once

#include <stdexcept>
#include <string>

namespace fogsim {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An id was looked up that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

/// An id was inserted twice.
class DuplicateError : public Error {
public:
    using Error::Error;
};

/// A reservation does not fit the remaining headroom of an entity.
class CapacityError : public Error {
public:
    CapacityError(const std::string& entity, double requested, double available)
        : Error("capacity exceeded on '" + entity + "': requested " + std::to_string(requested) +
                ", available " + std::to_string(available)),
          entity_(entity), requested_(requested), available_(available) {}

    const std::string& entity() const noexcept { return entity_; }
    double requested() const noexcept { return requested_; }
    double available() const noexcept { return available_; }

private:
    std::string entity_;
    double requested_;
    double available_;
};

/// An entity cannot be removed or shrunk because placed work still uses it.
class InUseError : public Error {
public:
    using Error::Error;
};

/// Internal bookkeeping went inconsistent (over-release, mismatched reservations).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a model or operation.
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace fogsim
