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

#include "beamtrack/errors.hpp"

#include <iomanip>
#include <sstream>

namespace beamtrack
{
    namespace
    {
        std::string with_field(const std::string &message, const std::string &field)
        {
            return field.empty() ? message : field + ": " + message;
        }

        std::string checksum_message(const std::string &path, unsigned stored, unsigned computed)
        {
            std::ostringstream os;
            os << "checksum mismatch in '" << path << "' (stored 0x" << std::hex << std::setw(8) << std::setfill('0')
               << stored << ", computed 0x" << std::setw(8) << computed << ")";
            return os.str();
        }
    }

    ConfigError::ConfigError(const std::string &message, std::string field)
        : Error(with_field(message, field)), field_(std::move(field))
    {
    }

    ChecksumError::ChecksumError(const std::string &path, unsigned stored, unsigned computed)
        : FormatError(checksum_message(path, stored, computed)), path_(path)
    {
    }

    MissingArtifactError::MissingArtifactError(const std::string &path)
        : Error("missing artifact '" + path + "'"), path_(path)
    {
    }

    void require_config(bool condition, const std::string &field, const std::string &message)
    {
        if (!condition)
            throw ConfigError(message, field);
    }
}
