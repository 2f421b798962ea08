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

#include "beamtrack/array_container.hpp"

#include "beamtrack/errors.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace beamtrack::io
{
    namespace
    {
        template <typename T>
        void put_le(std::vector<std::uint8_t> &out, T value)
        {
            for (std::size_t i = 0; i < sizeof(T); ++i)
                out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
        }

        class Reader
        {
        public:
            Reader(std::span<const std::uint8_t> bytes, const std::string &origin) : bytes_(bytes), origin_(origin) {}

            template <typename T>
            T get()
            {
                need(sizeof(T));
                std::uint64_t v = 0;
                for (std::size_t i = 0; i < sizeof(T); ++i)
                    v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
                pos_ += sizeof(T);
                return static_cast<T>(v);
            }

            void need(std::size_t n) const
            {
                if (pos_ + n > bytes_.size())
                    throw FormatError("truncated array container '" + origin_ + "'");
            }

            std::size_t position() const noexcept { return pos_; }

        private:
            std::span<const std::uint8_t> bytes_;
            std::string origin_;
            std::size_t pos_ = 0;
        };
    }

    NdArray::NdArray(std::vector<std::uint64_t> dims_, std::vector<float> data_) : dims(std::move(dims_)), data(std::move(data_))
    {
        if (element_count() != data.size())
            throw ShapeError("NdArray: dims do not match payload size");
    }

    std::size_t NdArray::element_count() const noexcept
    {
        std::size_t n = 1;
        for (auto d : dims)
            n *= static_cast<std::size_t>(d);
        return dims.empty() ? 0 : n;
    }

    NdArray NdArray::from_matrix(const Eigen::MatrixXd &m)
    {
        const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m.cast<float>();
        return NdArray({static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())},
                       std::vector<float>(rm.data(), rm.data() + rm.size()));
    }

    NdArray NdArray::from_matrix(const Eigen::MatrixXf &m)
    {
        const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
        return NdArray({static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())},
                       std::vector<float>(rm.data(), rm.data() + rm.size()));
    }

    NdArray NdArray::from_planes(std::span<const Eigen::MatrixXd> planes)
    {
        if (planes.empty())
            throw ShapeError("from_planes: no planes");
        const auto rows = planes.front().rows(), cols = planes.front().cols();
        std::vector<float> data;
        data.reserve(planes.size() * static_cast<std::size_t>(rows * cols));
        for (const auto &p : planes)
        {
            if (p.rows() != rows || p.cols() != cols)
                throw ShapeError("from_planes: planes differ in shape");
            const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = p.cast<float>();
            data.insert(data.end(), rm.data(), rm.data() + rm.size());
        }
        return NdArray({planes.size(), static_cast<std::uint64_t>(rows), static_cast<std::uint64_t>(cols)}, std::move(data));
    }

    Eigen::MatrixXf NdArray::plane(std::size_t index) const
    {
        if (dims.size() != 3 || index >= dims[0])
            throw ShapeError("plane: expected a 3-D array with more than " + std::to_string(index) + " planes");
        const auto rows = static_cast<Eigen::Index>(dims[1]), cols = static_cast<Eigen::Index>(dims[2]);
        using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        return Eigen::Map<const RowMat>(data.data() + index * static_cast<std::size_t>(rows * cols), rows, cols);
    }

    bool NdArray::operator==(const NdArray &other) const noexcept
    {
        return dims == other.dims && data.size() == other.data.size() &&
               (data.empty() || std::memcmp(data.data(), other.data.data(), data.size() * sizeof(float)) == 0);
    }

    std::uint32_t crc32(std::span<const std::uint8_t> bytes) noexcept
    {
        uLong crc = ::crc32(0L, Z_NULL, 0);
        // zlib takes uInt lengths; feed in chunks for very large payloads.
        std::size_t offset = 0;
        while (offset < bytes.size())
        {
            const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - offset, 1u << 30));
            crc = ::crc32(crc, bytes.data() + offset, chunk);
            offset += chunk;
        }
        return static_cast<std::uint32_t>(crc);
    }

    std::vector<std::uint8_t> encode_array(const NdArray &array)
    {
        if (array.element_count() != array.data.size())
            throw ShapeError("encode_array: dims do not match payload size");
        std::vector<std::uint8_t> out;
        out.reserve(16 + 8 * array.dims.size() + 4 * array.data.size() + 4);
        for (char c : container_magic)
            out.push_back(static_cast<std::uint8_t>(c));
        put_le<std::uint16_t>(out, container_version);
        put_le<std::uint16_t>(out, dtype_float32);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(array.dims.size()));
        for (auto d : array.dims)
            put_le<std::uint64_t>(out, d);
        for (float f : array.data)
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
        put_le<std::uint32_t>(out, crc32(out));
        return out;
    }

    NdArray decode_array(std::span<const std::uint8_t> bytes, const std::string &origin)
    {
        Reader in(bytes, origin);
        in.need(4);
        for (std::size_t i = 0; i < 4; ++i)
            if (bytes[i] != static_cast<std::uint8_t>(container_magic[i]))
                throw FormatError("bad magic in array container '" + origin + "'");
        (void)in.get<std::uint32_t>();
        const auto version = in.get<std::uint16_t>();
        if (version != container_version)
            throw FormatError("unsupported container version " + std::to_string(version) + " in '" + origin + "'");
        const auto dtype = in.get<std::uint16_t>();
        if (dtype != dtype_float32)
            throw FormatError("unsupported dtype code " + std::to_string(dtype) + " in '" + origin + "'");
        const auto ndim = in.get<std::uint32_t>();
        if (ndim > 16)
            throw FormatError("implausible dimension count in '" + origin + "'");

        std::vector<std::uint64_t> dims(ndim);
        std::size_t count = ndim ? 1 : 0;
        for (auto &d : dims)
        {
            d = in.get<std::uint64_t>();
            count *= static_cast<std::size_t>(d);
        }
        if (bytes.size() != in.position() + 4 * count + 4)
            throw FormatError("payload size mismatch in array container '" + origin + "'");

        const std::size_t crc_offset = bytes.size() - 4;
        std::uint32_t stored = 0;
        for (std::size_t i = 0; i < 4; ++i)
            stored |= static_cast<std::uint32_t>(bytes[crc_offset + i]) << (8 * i);
        const std::uint32_t computed = crc32(bytes.first(crc_offset));
        if (stored != computed)
            throw ChecksumError(origin, stored, computed);

        std::vector<float> data(count);
        for (auto &f : data)
            f = std::bit_cast<float>(in.get<std::uint32_t>());
        NdArray out;
        out.dims = std::move(dims);
        out.data = std::move(data);
        return out;
    }

    void write_array(const std::filesystem::path &path, const NdArray &array)
    {
        const auto bytes = encode_array(array);
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw Error("cannot open '" + path.string() + "' for writing");
        os.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!os)
            throw Error("failed writing '" + path.string() + "'");
    }

    NdArray read_array(const std::filesystem::path &path)
    {
        std::ifstream is(path, std::ios::binary);
        if (!is)
            throw MissingArtifactError(path.string());
        const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        return decode_array(bytes, path.string());
    }
}
