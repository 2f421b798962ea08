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

#ifndef BEAMTRACK_ARRAY_CONTAINER_HPP
#define BEAMTRACK_ARRAY_CONTAINER_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace beamtrack::io
{
    // Dense row-major float32 array.
    struct NdArray
    {
        std::vector<std::uint64_t> dims;
        std::vector<float> data;

        NdArray() = default;
        NdArray(std::vector<std::uint64_t> dims_, std::vector<float> data_);

        std::size_t element_count() const noexcept;

        // 2-D matrix <-> {rows, cols} array.
        static NdArray from_matrix(const Eigen::MatrixXd &m);
        static NdArray from_matrix(const Eigen::MatrixXf &m);
        // Stacks equally sized planes into {planes, rows, cols}.
        static NdArray from_planes(std::span<const Eigen::MatrixXd> planes);
        Eigen::MatrixXf plane(std::size_t index) const; // for 3-D arrays

        // Bitwise comparison of dims and payload.
        bool operator==(const NdArray &other) const noexcept;
    };

    // On-disk layout, all integers little-endian:
    //   "BTAR" | u16 version | u16 dtype | u32 ndim | u64 dims[ndim] | f32 payload | u32 CRC-32 of all preceding bytes
    inline constexpr std::array<char, 4> container_magic{'B', 'T', 'A', 'R'};
    inline constexpr std::uint16_t container_version = 1;
    inline constexpr std::uint16_t dtype_float32 = 1;

    std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept;

    std::vector<std::uint8_t> encode_array(const NdArray &array);
    // `origin` names the source in error messages.
    NdArray decode_array(std::span<const std::uint8_t> bytes, const std::string &origin);

    void write_array(const std::filesystem::path &path, const NdArray &array);
    NdArray read_array(const std::filesystem::path &path);
}

#endif
