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

#include "membug/ast.h"

namespace membug {

Type Type::PointerTo(const Type& element) {
  Type t(TypeKind::kPointer);
  t.element_ = std::make_shared<const Type>(element);
  return t;
}

Type Type::ArrayOf(const Type& element, int64_t length) {
  Type t(TypeKind::kArray);
  t.element_ = std::make_shared<const Type>(element);
  t.length_ = length;
  return t;
}

int64_t Type::size_bytes() const {
  switch (kind_) {
    case TypeKind::kVoid:
      return 0;
    case TypeKind::kChar:
      return 1;
    case TypeKind::kInt:
    case TypeKind::kPointer:
      return 8;
    case TypeKind::kArray:
      return length_ * element_->size_bytes();
  }
  return 0;
}

std::string Type::ToString() const {
  switch (kind_) {
    case TypeKind::kVoid:
      return "void";
    case TypeKind::kInt:
      return "int";
    case TypeKind::kChar:
      return "char";
    case TypeKind::kPointer:
      return element_->ToString() + "*";
    case TypeKind::kArray:
      return element_->ToString() + "[" + std::to_string(length_) + "]";
  }
  return "?";
}

bool Type::operator==(const Type& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case TypeKind::kPointer:
      return *element_ == *other.element_;
    case TypeKind::kArray:
      return length_ == other.length_ && *element_ == *other.element_;
    default:
      return true;
  }
}

const char* ToString(UnaryOp op) {
  switch (op) {
    case UnaryOp::kNegate:
      return "-";
    case UnaryOp::kNot:
      return "!";
    case UnaryOp::kDeref:
      return "*";
    case UnaryOp::kAddressOf:
      return "&";
  }
  return "?";
}

const char* ToString(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd:
      return "+";
    case BinaryOp::kSub:
      return "-";
    case BinaryOp::kMul:
      return "*";
    case BinaryOp::kDiv:
      return "/";
    case BinaryOp::kMod:
      return "%";
    case BinaryOp::kEq:
      return "==";
    case BinaryOp::kNe:
      return "!=";
    case BinaryOp::kLt:
      return "<";
    case BinaryOp::kLe:
      return "<=";
    case BinaryOp::kGt:
      return ">";
    case BinaryOp::kGe:
      return ">=";
    case BinaryOp::kAnd:
      return "&&";
    case BinaryOp::kOr:
      return "||";
  }
  return "?";
}

}  // namespace membug
