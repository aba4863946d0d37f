// Copyright 2026 The X-Claim Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xclaim/embedding.h"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "xclaim/error.h"
#include "xclaim/unicode.h"

namespace xclaim {
namespace {

constexpr char kDataFile[] = "embeddings.bin";
constexpr char kIndexFile[] = "embeddings.idx";
constexpr std::size_t kHeaderBytes = 12;

void PutU32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFF));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

EmbeddingMatrix EmbeddingMatrix::Slice(int begin, int end) const {
  if (begin < 0 || end < begin || end > rows()) {
    throw ValidationError("embedding slice out of range");
  }
  EmbeddingMatrix out;
  out.dim = dim;
  out.normalized = normalized;
  out.values.assign(values.begin() + static_cast<std::ptrdiff_t>(begin) * dim,
                    values.begin() + static_cast<std::ptrdiff_t>(end) * dim);
  if (!tokens.empty()) {
    out.tokens.assign(tokens.begin() + begin, tokens.begin() + end);
  }
  return out;
}

void EmbeddingMatrix::Normalize() {
  for (int i = 0; i < rows(); ++i) {
    float* r = values.data() + static_cast<std::size_t>(i) * dim;
    double norm = 0;
    for (int k = 0; k < dim; ++k) norm += static_cast<double>(r[k]) * r[k];
    norm = std::sqrt(norm);
    if (norm == 0) continue;
    for (int k = 0; k < dim; ++k) r[k] = static_cast<float>(r[k] / norm);
  }
  normalized = true;
}

Matrix CosineMatrix(const EmbeddingMatrix& left, const EmbeddingMatrix& right) {
  if (left.dim != right.dim) {
    throw ValidationError("embedding dimension mismatch: " +
                          std::to_string(left.dim) + " vs " +
                          std::to_string(right.dim));
  }
  Matrix out(left.rows(), right.rows());
  for (int i = 0; i < left.rows(); ++i) {
    const auto a = left.row(i);
    for (int j = 0; j < right.rows(); ++j) {
      const auto b = right.row(j);
      double dot = 0;
      for (int k = 0; k < left.dim; ++k) dot += static_cast<double>(a[k]) * b[k];
      out(i, j) = dot;
    }
  }
  return out;
}

std::string_view RoleName(EmbeddingRole role) {
  return role == EmbeddingRole::kClaim ? "claim" : "sentence";
}

EmbeddingRole ParseRole(std::string_view name) {
  if (name == "claim") return EmbeddingRole::kClaim;
  if (name == "sentence") return EmbeddingRole::kSentence;
  throw ValidationError("unknown embedding role '" + std::string(name) + "'");
}

HashedTrigramProvider::HashedTrigramProvider(int dim) : dim_(dim) {
  if (dim <= 0) throw ConfigError("embedding dimension must be positive");
}

EmbeddingMatrix HashedTrigramProvider::Embed(std::string_view,
                                             EmbeddingRole,
                                             std::span<const Token> tokens) const {
  EmbeddingMatrix m;
  m.dim = dim_;
  m.tokens.assign(tokens.begin(), tokens.end());
  m.values.assign(tokens.size() * dim_, 0.0f);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::u32string padded =
        U"<" + unicode::Decode(unicode::CaseFold(tokens[i].text)) + U">";
    float* r = m.values.data() + i * dim_;
    for (std::size_t k = 0; k + 3 <= padded.size(); ++k) {
      const std::string trigram = unicode::Encode(std::u32string_view(padded).substr(k, 3));
      r[Fnv1a(trigram) % dim_] += 1.0f;
    }
  }
  m.Normalize();
  return m;
}

FileEmbeddingStore::FileEmbeddingStore(std::string directory)
    : data_path_((std::filesystem::path(directory) / kDataFile).string()) {
  const std::string index_path =
      (std::filesystem::path(directory) / kIndexFile).string();
  std::ifstream in(index_path);
  if (!in) throw IoError("cannot open embedding index " + index_path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ParseError(index_path, line_number, "expected id<TAB>role<TAB>offset");
    }
    std::uint64_t offset = 0;
    try {
      std::size_t used = 0;
      offset = std::stoull(line.substr(tab2 + 1), &used);
      if (used != line.size() - tab2 - 1) throw std::invalid_argument("offset");
    } catch (const std::exception&) {
      throw ParseError(index_path, line_number, "bad offset");
    }
    EmbeddingRole role;
    try {
      role = ParseRole(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
    } catch (const ValidationError& e) {
      throw ParseError(index_path, line_number, e.what());
    }
    index_[{line.substr(0, tab1), role}] = offset;
  }
}

bool FileEmbeddingStore::Contains(std::string_view sample_id,
                                  EmbeddingRole role) const {
  return index_.find(std::make_pair(std::string(sample_id), role)) != index_.end();
}

EmbeddingMatrix FileEmbeddingStore::Read(std::string_view sample_id,
                                         EmbeddingRole role) const {
  auto it = index_.find(std::make_pair(std::string(sample_id), role));
  if (it == index_.end()) {
    throw ValidationError("no " + std::string(RoleName(role)) +
                          " embeddings for sample '" + std::string(sample_id) + "'");
  }
  std::ifstream in(data_path_, std::ios::binary);
  if (!in) throw IoError("cannot open " + data_path_);
  in.seekg(static_cast<std::streamoff>(it->second));
  unsigned char header[kHeaderBytes];
  if (!in.read(reinterpret_cast<char*>(header), kHeaderBytes)) {
    throw IoError("truncated embedding header for '" + std::string(sample_id) + "'");
  }
  EmbeddingMatrix m;
  const std::uint32_t rows = GetU32(header);
  m.dim = static_cast<int>(GetU32(header + 4));
  m.normalized = GetU32(header + 8) != 0;
  const std::size_t count = static_cast<std::size_t>(rows) * m.dim;
  std::vector<unsigned char> raw(count * 4);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size()))) {
    throw IoError("truncated embedding rows for '" + std::string(sample_id) + "'");
  }
  m.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    m.values[k] = std::bit_cast<float>(GetU32(raw.data() + 4 * k));
  }
  if (m.dim == 0 && rows > 0) {
    throw ValidationError("zero-dimensional embeddings for '" +
                          std::string(sample_id) + "'");
  }
  return m;
}

EmbeddingMatrix FileEmbeddingStore::Embed(std::string_view sample_id,
                                          EmbeddingRole role,
                                          std::span<const Token> tokens) const {
  EmbeddingMatrix m = Read(sample_id, role);
  if (static_cast<std::size_t>(m.rows()) != tokens.size()) {
    throw ValidationError("sample '" + std::string(sample_id) + "' " +
                          std::string(RoleName(role)) + " embeddings have " +
                          std::to_string(m.rows()) + " rows but " +
                          std::to_string(tokens.size()) + " tokens");
  }
  m.tokens.assign(tokens.begin(), tokens.end());
  return m;
}

EmbeddingStoreWriter::EmbeddingStoreWriter(std::string directory)
    : directory_(std::move(directory)) {}

void EmbeddingStoreWriter::Add(std::string_view sample_id, EmbeddingRole role,
                               const EmbeddingMatrix& matrix) {
  if (sample_id.find_first_of("\t\n") != std::string_view::npos) {
    throw ValidationError("sample id contains a tab or newline");
  }
  index_ += std::string(sample_id) + "\t" + std::string(RoleName(role)) + "\t" +
            std::to_string(data_.size()) + "\n";
  PutU32(data_, static_cast<std::uint32_t>(matrix.rows()));
  PutU32(data_, static_cast<std::uint32_t>(matrix.dim));
  PutU32(data_, matrix.normalized ? 1 : 0);
  for (float v : matrix.values) PutU32(data_, std::bit_cast<std::uint32_t>(v));
}

void EmbeddingStoreWriter::Finish() {
  namespace fs = std::filesystem;
  fs::create_directories(directory_);
  const auto write = [&](const char* name, const std::string& bytes) {
    const fs::path target = fs::path(directory_) / name;
    const fs::path temp = fs::path(directory_) / (std::string(name) + ".tmp");
    {
      std::ofstream out(temp, std::ios::binary);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw IoError("cannot write " + temp.string());
    }
    fs::rename(temp, target);
  };
  write(kDataFile, data_);
  write(kIndexFile, index_);
}

}  // namespace xclaim
