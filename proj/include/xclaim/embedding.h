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

// Token embedding matrices and the providers that supply them.
//
// Embedding store layout (a directory):
//
//   embeddings.bin  concatenated records; each record is a 12-byte header
//                   of three little-endian uint32 values (token count,
//                   dimension, normalized flag 0/1) followed by
//                   count * dimension little-endian IEEE-754 float32 values,
//                   row-major.
//   embeddings.idx  UTF-8 text, one line per record:
//                   "<sample id>\t<role>\t<byte offset of the header>",
//                   role being "claim" or "sentence".
//
// The "sentence" record of a sample holds one row per token of the whole
// post; per-sentence matrices are row slices of it.

#ifndef XCLAIM_EMBEDDING_H_
#define XCLAIM_EMBEDDING_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xclaim/matrix.h"
#include "xclaim/segment.h"

namespace xclaim {

struct EmbeddingMatrix {
  // Tokens the rows belong to. May be empty for matrices that were built
  // without token information; otherwise tokens.size() == rows().
  std::vector<Token> tokens;
  int dim = 0;
  std::vector<float> values;  // row-major
  bool normalized = false;

  int rows() const {
    return dim == 0 ? 0 : static_cast<int>(values.size()) / dim;
  }
  std::span<const float> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }

  // Rows [begin, end), with the matching tokens when present.
  EmbeddingMatrix Slice(int begin, int end) const;

  // Scales every nonzero row to unit L2 norm and sets `normalized`.
  void Normalize();
};

// Pairwise dot products (cosines for normalized inputs); rows follow `left`.
Matrix CosineMatrix(const EmbeddingMatrix& left, const EmbeddingMatrix& right);

enum class EmbeddingRole { kClaim, kSentence };

std::string_view RoleName(EmbeddingRole role);
EmbeddingRole ParseRole(std::string_view name);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // Returns one row per token. For kSentence the tokens are those of the
  // whole post. Implementations are deterministic and thread-safe.
  virtual EmbeddingMatrix Embed(std::string_view sample_id, EmbeddingRole role,
                                std::span<const Token> tokens) const = 0;
};

// Model-free provider: each token becomes the L2-normalized count vector of
// its case-folded character trigrams (padded with '<' and '>'), hashed into
// `dim` buckets with FNV-1a.
class HashedTrigramProvider : public EmbeddingProvider {
 public:
  explicit HashedTrigramProvider(int dim = 256);

  EmbeddingMatrix Embed(std::string_view sample_id, EmbeddingRole role,
                        std::span<const Token> tokens) const override;

 private:
  int dim_;
};

// Reads matrices from an embedding store directory. Concurrent readers are
// safe: every lookup opens its own stream.
class FileEmbeddingStore : public EmbeddingProvider {
 public:
  explicit FileEmbeddingStore(std::string directory);

  // Throws ValidationError if (sample_id, role) is missing or the stored row
  // count differs from tokens.size().
  EmbeddingMatrix Embed(std::string_view sample_id, EmbeddingRole role,
                        std::span<const Token> tokens) const override;

  // The raw stored matrix, without token information.
  EmbeddingMatrix Read(std::string_view sample_id, EmbeddingRole role) const;

  bool Contains(std::string_view sample_id, EmbeddingRole role) const;
  std::size_t size() const { return index_.size(); }

 private:
  std::string data_path_;
  std::map<std::pair<std::string, EmbeddingRole>, std::uint64_t, std::less<>>
      index_;
};

// Writes an embedding store. Files are written under temporary names and
// renamed into place by Finish().
class EmbeddingStoreWriter {
 public:
  explicit EmbeddingStoreWriter(std::string directory);

  void Add(std::string_view sample_id, EmbeddingRole role,
           const EmbeddingMatrix& matrix);
  void Finish();

 private:
  std::string directory_;
  std::string data_;
  std::string index_;
};

}  // namespace xclaim

#endif  // XCLAIM_EMBEDDING_H_
