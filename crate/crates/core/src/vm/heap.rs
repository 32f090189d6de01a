use std::collections::BTreeMap;

use crate::kafka::Addr;

/// An object `C{a..}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeapObject {
    pub class: String,
    pub fields: Vec<Addr>,
}

/// Append-only store. Addresses are handed out consecutively from 0 and
/// never reused; bindings are only ever replaced by field writes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Heap {
    objects: BTreeMap<Addr, HeapObject>,
    next: u32,
}

impl Heap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn alloc(&mut self, class: impl Into<String>, fields: Vec<Addr>) -> Addr {
        let a = Addr(self.next);
        self.next += 1;
        self.objects.insert(a, HeapObject { class: class.into(), fields });
        a
    }

    pub fn get(&self, a: Addr) -> Option<&HeapObject> {
        self.objects.get(&a)
    }

    /// Replaces the field values of an existing object, keeping its class.
    /// Returns false if `a` is unbound.
    pub fn replace(&mut self, a: Addr, fields: Vec<Addr>) -> bool {
        match self.objects.get_mut(&a) {
            Some(obj) => {
                obj.fields = fields;
                true
            }
            None => false,
        }
    }

    pub fn class_of(&self, a: Addr) -> Option<&str> {
        self.get(a).map(|o| o.class.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (Addr, &HeapObject)> {
        self.objects.iter().map(|(a, o)| (*a, o))
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}
