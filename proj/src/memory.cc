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

#include "membug/memory.h"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>

namespace membug {

std::string Address::ToString() const {
  char buffer[48];
  if (block == 0) {
    if (offset < 0) {
      std::snprintf(buffer, sizeof(buffer), "-0x%llx",
                    static_cast<unsigned long long>(-static_cast<int64_t>(offset)));
    } else {
      std::snprintf(buffer, sizeof(buffer), "0x%x",
                    static_cast<unsigned>(offset));
    }
  } else {
    std::snprintf(buffer, sizeof(buffer), "block%u%c%lld", block,
                  offset < 0 ? '-' : '+',
                  static_cast<long long>(offset < 0 ? -static_cast<int64_t>(offset)
                                                    : offset));
  }
  return buffer;
}

uint64_t Address::ToBits() const {
  return (static_cast<uint64_t>(block) << 32) | static_cast<uint32_t>(offset);
}

Address Address::FromBits(uint64_t bits) {
  return Address{static_cast<BlockId>(bits >> 32),
                 static_cast<int32_t>(static_cast<uint32_t>(bits & 0xFFFFFFFFu))};
}

std::optional<Address> Address::Parse(const std::string& text) {
  static const std::regex kBlock(R"(block([0-9]+)([+-])([0-9]+))");
  static const std::regex kRaw(R"((-?)0x([0-9a-f]+))");
  std::smatch m;
  try {
    if (std::regex_match(text, m, kBlock)) {
      const unsigned long long block = std::stoull(m[1]);
      const long long magnitude = std::stoll(m[3]);
      if (block == 0 || block > 0xFFFFFFFFull || magnitude > 0x80000000ll) {
        return std::nullopt;
      }
      const int64_t offset = m[2] == "-" ? -magnitude : magnitude;
      if (offset > INT32_MAX) return std::nullopt;
      return Address{static_cast<BlockId>(block), static_cast<int32_t>(offset)};
    }
    if (std::regex_match(text, m, kRaw)) {
      const long long magnitude = std::stoll(m[2], nullptr, 16);
      const int64_t offset = m[1] == "-" ? -magnitude : magnitude;
      if (offset > INT32_MAX || offset < INT32_MIN) return std::nullopt;
      return Address{0, static_cast<int32_t>(offset)};
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

void ShadowMap::Map(BlockId block, int64_t size, bool defined) {
  Bits& bits = blocks_[block];
  bits.a.assign(static_cast<size_t>(size), 1);
  bits.v.assign(static_cast<size_t>(size), defined ? 1 : 0);
}

void ShadowMap::Unmap(BlockId block) { blocks_.erase(block); }

const ShadowMap::Bits* ShadowMap::Find(Address addr) const {
  auto it = blocks_.find(addr.block);
  if (it == blocks_.end() || addr.offset < 0 ||
      static_cast<size_t>(addr.offset) >= it->second.a.size()) {
    return nullptr;
  }
  return &it->second;
}

bool ShadowMap::addressable(Address addr) const {
  const Bits* bits = Find(addr);
  return bits != nullptr && bits->a[addr.offset] != 0;
}

bool ShadowMap::defined(Address addr) const {
  const Bits* bits = Find(addr);
  return bits != nullptr && bits->v[addr.offset] != 0;
}

void ShadowMap::set_defined(Address addr, bool defined) {
  auto it = blocks_.find(addr.block);
  if (it == blocks_.end() || addr.offset < 0 ||
      static_cast<size_t>(addr.offset) >= it->second.a.size()) {
    return;
  }
  if (it->second.a[addr.offset]) it->second.v[addr.offset] = defined ? 1 : 0;
}

BlockId AddressSpace::Allocate(BlockKind kind, int64_t size, bool defined,
                               StackTrace alloc_site) {
  const BlockId id = next_id_++;
  Block block;
  block.id = id;
  block.kind = kind;
  block.size = size;
  block.data.assign(static_cast<size_t>(size), 0);
  block.pointer_tags.assign(static_cast<size_t>(size), 0);
  block.alloc_site = std::move(alloc_site);
  live_.emplace(id, std::move(block));
  shadow_.Map(id, size, defined);
  return id;
}

void AddressSpace::Free(BlockId id, StackTrace free_site) {
  auto it = live_.find(id);
  if (it == live_.end()) return;
  HeapBlock record;
  record.id = id;
  record.size = it->second.size;
  record.alloc_site = std::move(it->second.alloc_site);
  record.state = HeapState::kFreed;
  record.free_site = std::move(free_site);
  live_.erase(it);
  shadow_.Unmap(id);
  freed_.emplace(id, std::move(record));
  freed_order_.push_back(id);
  if (freed_order_.size() > kFreedWindow) {
    freed_.erase(freed_order_.front());
    freed_order_.pop_front();
  }
}

void AddressSpace::Release(BlockId id) {
  live_.erase(id);
  shadow_.Unmap(id);
}

const AddressSpace::Block* AddressSpace::FindLive(BlockId id) const {
  auto it = live_.find(id);
  return it == live_.end() ? nullptr : &it->second;
}

AddressSpace::Block* AddressSpace::FindLiveMutable(BlockId id) {
  auto it = live_.find(id);
  return it == live_.end() ? nullptr : &it->second;
}

const HeapBlock* AddressSpace::FindFreed(BlockId id) const {
  auto it = freed_.find(id);
  return it == freed_.end() ? nullptr : &it->second;
}

std::vector<const AddressSpace::Block*> AddressSpace::LiveBlocks() const {
  std::vector<const Block*> blocks;
  blocks.reserve(live_.size());
  for (const auto& [id, block] : live_) blocks.push_back(&block);
  return blocks;
}

Value AddressSpace::Load(Address addr, int width) const {
  Value value;
  value.width = static_cast<uint8_t>(width);
  const Block* block = FindLive(addr.block);
  for (int i = 0; i < width; ++i) {
    const Address byte = addr + i;
    if (block != nullptr && shadow_.addressable(byte)) {
      value.bits |= static_cast<uint64_t>(block->data[byte.offset]) << (8 * i);
      if (shadow_.defined(byte)) value.vmask |= 1u << i;
    } else {
      value.vmask |= 1u << i;
    }
  }
  return value;
}

void AddressSpace::Store(Address addr, const Value& value, bool is_pointer) {
  Block* block = FindLiveMutable(addr.block);
  if (block == nullptr) return;
  const int64_t width = value.width;
  bool whole = true;
  for (int64_t i = 0; i < width; ++i) {
    const Address byte = addr + i;
    if (!shadow_.addressable(byte)) {
      whole = false;
      continue;
    }
    block->data[byte.offset] = static_cast<uint8_t>(value.bits >> (8 * i));
    shadow_.set_defined(byte, (value.vmask >> i) & 1u);
  }
  // Any tag whose 8-byte word overlaps the written range is stale.
  const int64_t first = std::max<int64_t>(0, int64_t{addr.offset} - 7);
  const int64_t last = std::min<int64_t>(block->size, addr.offset + width);
  for (int64_t i = first; i < last; ++i) block->pointer_tags[i] = 0;
  if (is_pointer && whole && addr.offset >= 0) {
    block->pointer_tags[addr.offset] = 1;
  }
}

std::vector<Address> AddressSpace::PointersIn(const Block& block) const {
  std::vector<Address> pointers;
  for (int64_t i = 0; i + 8 <= block.size; ++i) {
    if (!block.pointer_tags[i]) continue;
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<uint64_t>(block.data[i + b]) << (8 * b);
    }
    pointers.push_back(Address::FromBits(bits));
  }
  return pointers;
}

const char* ToString(MemErrorKind kind) {
  switch (kind) {
    case MemErrorKind::kInvalidRead:
      return "InvalidRead";
    case MemErrorKind::kInvalidWrite:
      return "InvalidWrite";
    case MemErrorKind::kUseOfUninitialized:
      return "UseOfUninitialized";
    case MemErrorKind::kConditionalJumpOnUninitialized:
      return "ConditionalJumpOnUninitialized";
    case MemErrorKind::kInvalidFree:
      return "InvalidFree";
    case MemErrorKind::kDoubleFree:
      return "DoubleFree";
    case MemErrorKind::kDivisionByZero:
      return "DivisionByZero";
  }
  return "?";
}

const char* ToString(AddressClassKind kind) {
  switch (kind) {
    case AddressClassKind::kNull:
      return "null";
    case AddressClassKind::kFreedBlock:
      return "freedBlock";
    case AddressClassKind::kPastEndOfBlock:
      return "pastEndOfBlock";
    case AddressClassKind::kNeverAllocated:
      return "neverAllocated";
  }
  return "?";
}

AddressClass ClassifyAddress(const AddressSpace& memory, Address addr) {
  constexpr int64_t kPastEndWindow = 64;
  AddressClass cls;
  if (addr.is_null()) {
    cls.kind = AddressClassKind::kNull;
    return cls;
  }
  if (addr.block == 0) return cls;
  if (const HeapBlock* freed = memory.FindFreed(addr.block)) {
    if (addr.offset >= 0 && addr.offset < freed->size) {
      cls.kind = AddressClassKind::kFreedBlock;
      cls.block = freed->id;
      cls.block_size = freed->size;
      cls.distance = addr.offset;
    }
    return cls;
  }
  if (const AddressSpace::Block* live = memory.FindLive(addr.block)) {
    const int64_t past = int64_t{addr.offset} - live->size;
    if (past >= 0 && past < kPastEndWindow) {
      cls.kind = AddressClassKind::kPastEndOfBlock;
      cls.block = live->id;
      cls.block_size = live->size;
      cls.distance = past;
    }
  }
  return cls;
}

bool IsFatalAccess(Address addr, const AddressClass& cls) {
  return addr.block == 0 || cls.kind == AddressClassKind::kNull ||
         cls.kind == AddressClassKind::kFreedBlock;
}

std::optional<MemError> CheckAccess(const AddressSpace& memory, Address addr,
                                    int64_t size, AccessKind kind,
                                    const StackTrace& stack) {
  for (int64_t i = 0; i < size; ++i) {
    const Address byte = addr + i;
    if (memory.shadow().addressable(byte)) continue;
    MemError error;
    error.kind = kind == AccessKind::kRead ? MemErrorKind::kInvalidRead
                                           : MemErrorKind::kInvalidWrite;
    error.size = size;
    error.address = byte;
    error.address_class = ClassifyAddress(memory, byte);
    error.fatal = IsFatalAccess(byte, *error.address_class);
    error.stack = stack;
    if (!stack.frames.empty()) error.location = stack.frames.front().location;
    return error;
  }
  return std::nullopt;
}

std::optional<MemError> CheckUse(const Value& value, UseContext context,
                                 const StackTrace& stack) {
  if (value.defined()) return std::nullopt;
  MemError error;
  if (context == UseContext::kBranchCondition) {
    error.kind = MemErrorKind::kConditionalJumpOnUninitialized;
  } else {
    error.kind = MemErrorKind::kUseOfUninitialized;
    error.size = value.width;
  }
  error.stack = stack;
  if (!stack.frames.empty()) error.location = stack.frames.front().location;
  return error;
}

int64_t LeakReport::definitely_lost_bytes() const {
  int64_t total = 0;
  for (const LeakedBlock& leak : definitely_lost) total += leak.bytes;
  return total;
}

int64_t LeakReport::still_reachable_bytes() const {
  int64_t total = 0;
  for (const LeakedBlock& leak : still_reachable) total += leak.bytes;
  return total;
}

LeakReport LeakScan(const AddressSpace& memory) {
  std::set<BlockId> reachable;
  std::vector<const AddressSpace::Block*> worklist;
  auto visit = [&](Address target) {
    const AddressSpace::Block* block = memory.FindLive(target.block);
    if (block == nullptr || block->kind != BlockKind::kHeap) return;
    if (target.offset < 0 || target.offset > block->size) return;
    if (reachable.insert(block->id).second) worklist.push_back(block);
  };
  for (const AddressSpace::Block* block : memory.LiveBlocks()) {
    if (block->kind == BlockKind::kHeap) continue;
    for (Address target : memory.PointersIn(*block)) visit(target);
  }
  while (!worklist.empty()) {
    const AddressSpace::Block* block = worklist.back();
    worklist.pop_back();
    for (Address target : memory.PointersIn(*block)) visit(target);
  }

  LeakReport report;
  for (const AddressSpace::Block* block : memory.LiveBlocks()) {
    if (block->kind != BlockKind::kHeap) continue;
    LeakedBlock leak;
    leak.block.id = block->id;
    leak.block.size = block->size;
    leak.block.alloc_site = block->alloc_site;
    leak.bytes = block->size;
    if (reachable.count(block->id)) {
      report.still_reachable.push_back(std::move(leak));
    } else {
      report.definitely_lost.push_back(std::move(leak));
    }
  }
  return report;
}

}  // namespace membug
