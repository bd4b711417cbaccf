/// A queue element: a 32-bit priority key and a 32-bit payload.
/// Smaller keys have higher priority.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Element {
    pub key: u32,
    pub value: u32,
}

impl Element {
    pub fn new(key: u32, value: u32) -> Self {
        Self { key, value }
    }
}

impl From<(u32, u32)> for Element {
    fn from((key, value): (u32, u32)) -> Self {
        Self { key, value }
    }
}
