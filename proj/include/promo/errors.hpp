#pragma once

#include <stdexcept>

namespace promo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Repository access
struct GitError : Error {
    using Error::Error;
};
struct UnknownRef : GitError {
    using GitError::GitError;
};
struct UnknownCommit : GitError {
    using GitError::GitError;
};
struct RangeResolutionFailed : GitError {
    using GitError::GitError;
};
struct RepositoryAccessFailed : GitError {
    using GitError::GitError;
};

// Pipeline loading
struct DirectoryNotFound : Error {
    using Error::Error;
};

// Promotion guard
struct SoakTimestampUnavailable : Error {
    using Error::Error;
};

// Summarizer backends
struct BackendUnavailable : Error {
    using Error::Error;
};
struct BackendRefusal : Error {
    using Error::Error;
};

// Configuration
struct ConfigInvalid : Error {
    using Error::Error;
};

// Mail delivery
struct SmtpError : Error {
    using Error::Error;
};
struct SmtpConnectFailed : SmtpError {
    using SmtpError::SmtpError;
};
struct SmtpAuthFailed : SmtpError {
    using SmtpError::SmtpError;
};
struct SmtpRejected : SmtpError {
    using SmtpError::SmtpError;
};

} // namespace promo
