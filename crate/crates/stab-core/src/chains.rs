pub struct Violation;
impl std::fmt::Display for Violation { fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result { write!(f, "violation") } }
impl std::fmt::Debug for Violation { fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result { write!(f, "violation") } }
