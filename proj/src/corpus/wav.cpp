// corpus/wav.cpp

// Copyright 2026  The vsv authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "vsv/corpus/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vsv/core/common.hpp"

static_assert(std::endian::native == std::endian::little,
              "WAV parsing assumes a little-endian host");

namespace vsv {
namespace corpus {

namespace {

template <typename T>
T ReadLe(std::istream &is, const std::string &path, const char *what) {
  T value;
  is.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!is) throw DataError(path + ": truncated WAV while reading " + what);
  return value;
}

void ReadTag(std::istream &is, char out[4], const std::string &path) {
  is.read(out, 4);
  if (!is) throw DataError(path + ": truncated WAV while reading chunk tag");
}

bool TagIs(const char tag[4], const char *want) {
  return std::memcmp(tag, want, 4) == 0;
}

}  // namespace

Utterance ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV file: " + path);

  char tag[4];
  ReadTag(is, tag, path);
  if (!TagIs(tag, "RIFF")) throw DataError(path + ": not a RIFF file");
  ReadLe<std::uint32_t>(is, path, "RIFF size");
  ReadTag(is, tag, path);
  if (!TagIs(tag, "WAVE")) throw DataError(path + ": not a WAVE file");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format_code = 0;
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;
  bool have_data = false;

  while (is.peek() != std::istream::traits_type::eof()) {
    ReadTag(is, tag, path);
    std::uint32_t chunk_size = ReadLe<std::uint32_t>(is, path, "chunk size");
    if (TagIs(tag, "fmt ")) {
      if (chunk_size < 16)
        throw DataError(path + ": malformed fmt chunk");
      format_code = ReadLe<std::uint16_t>(is, path, "format code");
      channels = ReadLe<std::uint16_t>(is, path, "channel count");
      sample_rate = ReadLe<std::uint32_t>(is, path, "sample rate");
      ReadLe<std::uint32_t>(is, path, "byte rate");
      ReadLe<std::uint16_t>(is, path, "block align");
      bits = ReadLe<std::uint16_t>(is, path, "bit depth");
      if (chunk_size > 16)
        is.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (TagIs(tag, "data")) {
      if (!have_fmt)
        throw DataError(path + ": data chunk before fmt chunk");
      if (format_code != 1)
        throw DataError(path + ": unsupported WAV encoding (expected PCM)");
      if (bits != 16)
        throw DataError(path + ": unsupported bit depth (expected 16)");
      if (channels != 1)
        throw DataError(path + ": unsupported channel count (expected mono)");
      if (chunk_size == 0 || chunk_size % 2 != 0)
        throw DataError(path + ": empty or malformed data chunk");
      std::uint32_t n = chunk_size / 2;
      std::vector<std::int16_t> raw(n);
      is.read(reinterpret_cast<char *>(raw.data()), chunk_size);
      if (!is) throw DataError(path + ": truncated WAV data");
      samples.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) samples[i] = raw[i] / 32768.0;
      have_data = true;
    } else {
      // Unknown chunk; skip its payload (chunks are word aligned).
      is.seekg(chunk_size + (chunk_size & 1u), std::ios::cur);
      if (!is) throw DataError(path + ": truncated WAV chunk");
    }
  }

  if (!have_fmt || !have_data)
    throw DataError(path + ": missing fmt or data chunk");
  if (sample_rate == 0) throw DataError(path + ": zero sample rate");

  Utterance utt;
  utt.samples = std::move(samples);
  utt.sample_rate = static_cast<int>(sample_rate);
  return utt;
}

void WriteWav(const std::string &path, const std::vector<double> &samples,
              int sample_rate) {
  if (sample_rate <= 0) throw DataError("WriteWav: bad sample rate");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open for writing: " + path);

  std::vector<std::int16_t> raw(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double s = samples[i];
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    raw[i] = static_cast<std::int16_t>(std::lrint(s * 32767.0));
  }

  std::uint32_t data_bytes = static_cast<std::uint32_t>(raw.size() * 2);
  auto put_u32 = [&os](std::uint32_t v) {
    os.write(reinterpret_cast<const char *>(&v), 4);
  };
  auto put_u16 = [&os](std::uint16_t v) {
    os.write(reinterpret_cast<const char *>(&v), 2);
  };

  os.write("RIFF", 4);
  put_u32(36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(static_cast<std::uint32_t>(sample_rate) * 2);  // byte rate
  put_u16(2);   // block align
  put_u16(16);  // bits
  os.write("data", 4);
  put_u32(data_bytes);
  os.write(reinterpret_cast<const char *>(raw.data()), data_bytes);
  if (!os) throw DataError("failed writing WAV: " + path);
}

}  // namespace corpus
}  // namespace vsv
