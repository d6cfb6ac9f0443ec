// Copyright 2026 The membug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MEMBUG_MEMORY_H_
#define MEMBUG_MEMORY_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "membug/ast.h"

namespace membug {

using BlockId = uint32_t;

// Symbolic address: a block plus a byte offset. Block 0 is the unmapped page
// that holds the null address; real blocks are numbered from 1 and never reused.
struct Address {
  BlockId block = 0;
  int32_t offset = 0;

  bool is_null() const { return block == 0 && offset == 0; }
  Address operator+(int64_t delta) const {
    return Address{block, static_cast<int32_t>(offset + delta)};
  }
  // "0x0", "0x10", "block3+4", "block3-1".
  std::string ToString() const;
  // Pointer bit pattern as stored in simulated memory.
  uint64_t ToBits() const;
  static Address FromBits(uint64_t bits);
  // Parses the ToString() form.
  static std::optional<Address> Parse(const std::string& text);

  auto operator<=>(const Address&) const = default;
};

struct StackFrame {
  std::string function;
  SourceLocation location;

  bool operator==(const StackFrame&) const = default;
};

// Innermost frame first; the outermost frame is always main.
struct StackTrace {
  std::vector<StackFrame> frames;

  bool operator==(const StackTrace&) const = default;
};

// Scalar runtime value with one definedness bit per byte (bit i = byte i).
struct Value {
  uint64_t bits = 0;
  uint8_t vmask = 0;
  uint8_t width = 8;

  static uint8_t FullMask(int width) {
    return static_cast<uint8_t>(width >= 8 ? 0xFF : (1u << width) - 1);
  }
  static Value Int(int64_t v) {
    return Value{static_cast<uint64_t>(v), 0xFF, 8};
  }
  static Value Char(int64_t v) {
    return Value{static_cast<uint64_t>(v) & 0xFF, 0x01, 1};
  }
  static Value Pointer(Address a) { return Value{a.ToBits(), 0xFF, 8}; }

  bool defined() const { return vmask == FullMask(width); }
  // Sign-extended integer view.
  int64_t as_int() const {
    return width == 1 ? static_cast<int8_t>(bits & 0xFF)
                      : static_cast<int64_t>(bits);
  }
  Address as_address() const { return Address::FromBits(bits); }
};

enum class BlockKind { kGlobal, kLiteral, kArgv, kStack, kHeap };

enum class HeapState { kLive, kFreed };

struct HeapBlock {
  BlockId id = 0;
  int64_t size = 0;
  StackTrace alloc_site;
  HeapState state = HeapState::kLive;
  // Present iff state == kFreed.
  std::optional<StackTrace> free_site;
};

// Per-byte addressability (A) and definedness (V) bits for every mapped block.
// Unmapped bytes, including those of freed and released blocks, have A=0.
class ShadowMap {
 public:
  void Map(BlockId block, int64_t size, bool defined);
  void Unmap(BlockId block);

  bool addressable(Address addr) const;
  // Meaningful only for addressable bytes.
  bool defined(Address addr) const;
  void set_defined(Address addr, bool defined);

 private:
  struct Bits {
    std::vector<uint8_t> a;
    std::vector<uint8_t> v;
  };
  const Bits* Find(Address addr) const;

  std::unordered_map<BlockId, Bits> blocks_;
};

// Simulated address space: block contents, block metadata and shadow state.
class AddressSpace {
 public:
  // Extents of this many most-recently freed heap blocks are remembered for
  // classification and double-free detection.
  static constexpr size_t kFreedWindow = 1000;

  struct Block {
    BlockId id = 0;
    BlockKind kind = BlockKind::kHeap;
    int64_t size = 0;
    std::vector<uint8_t> data;
    // 1 at the first byte of every stored pointer value.
    std::vector<uint8_t> pointer_tags;
    StackTrace alloc_site;
  };

  BlockId Allocate(BlockKind kind, int64_t size, bool defined,
                   StackTrace alloc_site = {});
  // Heap blocks only: moves the block to the freed window.
  void Free(BlockId id, StackTrace free_site);
  // Stack blocks: forgotten entirely when their scope ends.
  void Release(BlockId id);

  const Block* FindLive(BlockId id) const;
  const HeapBlock* FindFreed(BlockId id) const;
  // Live blocks in id order.
  std::vector<const Block*> LiveBlocks() const;

  const ShadowMap& shadow() const { return shadow_; }

  // Raw access without checks. Unaddressable bytes read as defined zeros and
  // are silently dropped on write.
  Value Load(Address addr, int width) const;
  void Store(Address addr, const Value& value, bool is_pointer);

  // Pointer values recorded at tagged offsets of a live block.
  std::vector<Address> PointersIn(const Block& block) const;

  BlockId next_id() const { return next_id_; }

 private:
  Block* FindLiveMutable(BlockId id);

  BlockId next_id_ = 1;
  std::map<BlockId, Block> live_;
  std::deque<BlockId> freed_order_;
  std::unordered_map<BlockId, HeapBlock> freed_;
  ShadowMap shadow_;
};

enum class AccessKind { kRead, kWrite };

enum class UseContext { kBranchCondition, kAddressOperand, kOutput, kDivisor };

enum class MemErrorKind {
  kInvalidRead,
  kInvalidWrite,
  kUseOfUninitialized,
  kConditionalJumpOnUninitialized,
  kInvalidFree,
  kDoubleFree,
  kDivisionByZero,
};

const char* ToString(MemErrorKind kind);

enum class AddressClassKind { kNull, kFreedBlock, kPastEndOfBlock, kNeverAllocated };

const char* ToString(AddressClassKind kind);

struct AddressClass {
  AddressClassKind kind = AddressClassKind::kNeverAllocated;
  // For kFreedBlock / kPastEndOfBlock: the block, its size, and the distance
  // of the address from the block start (freed) or end (past end).
  BlockId block = 0;
  int64_t block_size = 0;
  int64_t distance = 0;

  bool operator==(const AddressClass&) const = default;
};

struct MemError {
  MemErrorKind kind = MemErrorKind::kInvalidRead;
  // Access or value width; absent for jump, free and division kinds.
  std::optional<int64_t> size;
  // Present for invalid accesses and frees.
  std::optional<Address> address;
  std::optional<AddressClass> address_class;
  StackTrace stack;
  SourceLocation location;
  // Terminates execution (models SIGSEGV).
  bool fatal = false;
};

AddressClass ClassifyAddress(const AddressSpace& memory, Address addr);

// Null, freed-block and unmapped-page accesses terminate the program.
bool IsFatalAccess(Address addr, const AddressClass& cls);

// ok (nullopt) iff all `size` bytes at `addr` are addressable. The reported
// address and class are those of the first unaddressable byte.
std::optional<MemError> CheckAccess(const AddressSpace& memory, Address addr,
                                    int64_t size, AccessKind kind,
                                    const StackTrace& stack);

// ok (nullopt) iff every byte of `value` is defined.
std::optional<MemError> CheckUse(const Value& value, UseContext context,
                                 const StackTrace& stack);

struct LeakedBlock {
  HeapBlock block;
  int64_t bytes = 0;
};

struct LeakReport {
  std::vector<LeakedBlock> definitely_lost;
  std::vector<LeakedBlock> still_reachable;

  int64_t definitely_lost_bytes() const;
  int64_t still_reachable_bytes() const;
};

// Mark-and-scan from pointers stored in every live non-heap block.
LeakReport LeakScan(const AddressSpace& memory);

}  // namespace membug

#endif  // MEMBUG_MEMORY_H_
