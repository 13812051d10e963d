# THIS FILE IS GENERATED FROM hkverify SETUP.PY
short_version = '0.3.0'
version = '0.3.0.dev0'
release = False
