pub mod coeff; pub mod map; pub mod module;
