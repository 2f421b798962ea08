// SPDX-License-Identifier: Apache-2.0
//
// beamtrack: sensing-aided mmWave beam tracking workbench
// Copyright (C) 2026 The beamtrack authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMTRACK_ERRORS_HPP
#define BEAMTRACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beamtrack
{
    // Root of every exception thrown by the library.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Invalid configuration value. `field` is a dotted path such as "training.beta".
    class ConfigError : public Error
    {
    public:
        explicit ConfigError(const std::string &message, std::string field = {});
        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    class ShapeError : public Error
    {
    public:
        using Error::Error;
    };

    class IndexError : public Error
    {
    public:
        using Error::Error;
    };

    class WindowingError : public Error
    {
    public:
        using Error::Error;
    };

    class AlignmentError : public Error
    {
    public:
        using Error::Error;
    };

    // Malformed container / manifest / checkpoint file.
    class FormatError : public Error
    {
    public:
        using Error::Error;
    };

    class ChecksumError : public FormatError
    {
    public:
        ChecksumError(const std::string &path, unsigned stored, unsigned computed);
        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };

    class MissingArtifactError : public Error
    {
    public:
        explicit MissingArtifactError(const std::string &path);
        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };

    // Non-finite loss or similar unrecoverable training failure.
    class TrainingAbort : public Error
    {
    public:
        using Error::Error;
    };

    // Throws ConfigError(message, field) unless `condition` holds.
    void require_config(bool condition, const std::string &field, const std::string &message);
}

#endif
