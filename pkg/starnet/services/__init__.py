# Services package: encoding, classical bounds, quantum core, network, certificates, optimization
