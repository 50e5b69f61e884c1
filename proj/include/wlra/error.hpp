#pragma once
//
// Module      : wlra/error
// Description : exception types shared by every module; the CLI maps them to exit codes
//

#include <stdexcept>
#include <string>

namespace wlra {

// Base of all library errors.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class shape_error : public error
{
public:
    using error::error;
};

// A precondition on a scalar argument or a rank does not hold.
class validation_error : public error
{
public:
    using error::error;
};

// A matrix that must have full column (or row) rank does not.
class rank_deficient_error : public validation_error
{
public:
    using validation_error::validation_error;
};

// An iterative kernel ran out of its sweep budget.
class convergence_error : public error
{
public:
    using error::error;
};

// Reading or writing a file failed, or its content is malformed.
class io_error : public error
{
public:
    using error::error;
};

// Something that cannot happen for valid inputs did happen.
class internal_error : public error
{
public:
    using error::error;
};

} // namespace wlra
