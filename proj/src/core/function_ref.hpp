//===----------------------------------------------------------------------===//
//
// Part of the idws project, under the MIT License.
// See LICENSE for license information.
//
//===----------------------------------------------------------------------===//
#ifndef IDWS_CORE_FUNCTION_REF_HPP
#define IDWS_CORE_FUNCTION_REF_HPP

#include <cstdint>
#include <type_traits>
#include <utility>

namespace idws {

// Non-owning callable reference (the usual two-pointer erasure). The loop
// drivers take bodies by FunctionRef so a lambda capture never allocates and
// every scheduler pays the same single indirect call per iteration — the
// overhead comparison between schedulers stays apples-to-apples.
template <typename Sig> class FunctionRef;

template <typename R, typename... Args> class FunctionRef<R(Args...)> {
public:
  template <typename F,
            typename = std::enable_if_t<
                !std::is_same_v<std::remove_cvref_t<F>, FunctionRef> &&
                std::is_invocable_r_v<R, F &, Args...>>>
  FunctionRef(F &&f) // NOLINT: implicit by design, mirrors std::function_ref
      : obj_(const_cast<void *>(static_cast<const void *>(&f))),
        call_([](void *obj, Args... args) -> R {
          return (*static_cast<std::remove_reference_t<F> *>(obj))(
              std::forward<Args>(args)...);
        }) {}

  R operator()(Args... args) const {
    return call_(obj_, std::forward<Args>(args)...);
  }

private:
  void *obj_;
  R (*call_)(void *, Args...);
};

// Loop body contract: invoked once per iteration index, possibly concurrently
// on all threads; distinct indices must be independent (caller's obligation).
using LoopBody = FunctionRef<void(uint64_t index, uint32_t thread_id)>;

} // namespace idws

#endif // IDWS_CORE_FUNCTION_REF_HPP
