// Copyright 2026 The bballoc Authors
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

#ifndef BBALLOC_STRONG_INDEX_HPP_
#define BBALLOC_STRONG_INDEX_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

namespace bballoc {

// A typed integer index. Slots, users and products each get their own tag so
// that a user index can never be used to address a slot array.
template <typename Tag>
class StrongIndex {
 public:
  constexpr StrongIndex() = default;
  constexpr explicit StrongIndex(int32_t value) : value_(value) {}

  constexpr int32_t value() const { return value_; }
  constexpr std::size_t pos() const { return static_cast<std::size_t>(value_); }

  constexpr auto operator<=>(const StrongIndex&) const = default;

  constexpr StrongIndex& operator++() {
    ++value_;
    return *this;
  }

  friend std::ostream& operator<<(std::ostream& os, StrongIndex index) {
    return os << index.value_;
  }

 private:
  int32_t value_ = -1;
};

struct SlotTag {};
struct UserTag {};
struct ProductTag {};

using SlotIndex = StrongIndex<SlotTag>;
using UserIndex = StrongIndex<UserTag>;
using ProductIndex = StrongIndex<ProductTag>;

// std::vector addressed by a StrongIndex.
template <typename Index, typename T>
class StrongVector : public std::vector<T> {
 public:
  using Base = std::vector<T>;
  using Base::Base;
  using Base::operator[];

  typename Base::reference operator[](Index i) { return Base::operator[](i.pos()); }
  typename Base::const_reference operator[](Index i) const {
    return Base::operator[](i.pos());
  }

  Index end_index() const { return Index(static_cast<int32_t>(this->size())); }
};

// Iterates 0..n-1 as typed indices: `for (SlotIndex s : index_range<SlotIndex>(n))`.
template <typename Index>
class IndexRange {
 public:
  class Iterator {
   public:
    constexpr explicit Iterator(int32_t v) : v_(v) {}
    constexpr Index operator*() const { return Index(v_); }
    constexpr Iterator& operator++() {
      ++v_;
      return *this;
    }
    constexpr bool operator==(const Iterator&) const = default;

   private:
    int32_t v_;
  };

  constexpr explicit IndexRange(std::size_t n) : n_(static_cast<int32_t>(n)) {}
  constexpr Iterator begin() const { return Iterator(0); }
  constexpr Iterator end() const { return Iterator(n_); }

 private:
  int32_t n_;
};

template <typename Index>
constexpr IndexRange<Index> index_range(std::size_t n) {
  return IndexRange<Index>(n);
}

}  // namespace bballoc

template <typename Tag>
struct std::hash<bballoc::StrongIndex<Tag>> {
  std::size_t operator()(bballoc::StrongIndex<Tag> i) const noexcept {
    return std::hash<int32_t>{}(i.value());
  }
};

#endif  // BBALLOC_STRONG_INDEX_HPP_
