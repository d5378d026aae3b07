//! Priority structures: a truncating Fibonacci heap for fast memory, a
//! red-black tree queue for slow memory, and the sort built on the latter.

pub mod fib;
pub mod member;
pub mod rbtree;
pub mod select;
pub mod sort;
pub mod truncating;

pub use fib::FibHeap;
pub use member::MemberMap;
pub use rbtree::RbQueue;
pub use select::select_nth;
pub use sort::we_sort;
pub use truncating::TruncatingHeap;
