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

#ifndef BEAMTRACK_JSON_READER_HPP
#define BEAMTRACK_JSON_READER_HPP

#include "beamtrack/errors.hpp"

#include <nlohmann/json.hpp>

#include <set>
#include <string>

namespace beamtrack::detail
{
    // Strict reader for one JSON object: every key must be consumed, type errors and
    // unknown keys raise ConfigError with the dotted field path.
    class ObjectReader
    {
    public:
        ObjectReader(const nlohmann::json &j, std::string path) : j_(j), path_(std::move(path))
        {
            if (!j_.is_object())
                throw ConfigError("expected an object", path_);
        }

        std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

        template <class T>
        bool get(const std::string &key, T &out)
        {
            const auto it = j_.find(key);
            if (it == j_.end())
                return false;
            used_.insert(key);
            try
            {
                out = it->template get<T>();
            }
            catch (const nlohmann::json::exception &)
            {
                throw ConfigError("wrong value type", field(key));
            }
            return true;
        }

        const nlohmann::json *child(const std::string &key)
        {
            const auto it = j_.find(key);
            if (it == j_.end())
                return nullptr;
            used_.insert(key);
            return &*it;
        }

        void finish() const
        {
            for (const auto &item : j_.items())
                if (!used_.count(item.key()))
                    throw ConfigError("unknown key", field(item.key()));
        }

    private:
        const nlohmann::json &j_;
        std::string path_;
        std::set<std::string> used_;
    };
}

#endif
